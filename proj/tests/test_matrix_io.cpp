#include <sstream>

#include <gtest/gtest.h>

#include "satreg/matrix_io.hpp"
#include "satreg/pde_models.hpp"

using namespace satreg;

TEST(MatrixIo, ParsesExampleFormat) {
  std::istringstream in(R"(# toy
A 2 2
-1 0
0 -2
Bc 2 1
1
1
Bd 2 0
C 1 2
1 1
)");
  const StateSpaceModel m = read_model(in);
  EXPECT_EQ(m.states(), 2);
  EXPECT_EQ(m.inputs(), 1);
  EXPECT_EQ(m.disturbances(), 0);
  EXPECT_EQ(m.A()(1, 1), -2.0);
  EXPECT_NEAR(transfer(m, 0.0).Pc(0, 0).real(), 1.5, 1e-15);
}

TEST(MatrixIo, RoundTripIsExact) {
  const StateSpaceModel heat = build_heat2d({5});
  std::stringstream ss;
  write_model(ss, heat);
  const StateSpaceModel back = read_model(ss);
  EXPECT_EQ(back.A(), heat.A());
  EXPECT_EQ(back.Bc(), heat.Bc());
  EXPECT_EQ(back.Bd(), heat.Bd());
  EXPECT_EQ(back.C(), heat.C());
}

TEST(MatrixIo, Rejections) {
  std::istringstream missing("A 1 1\n-1\nBc 1 1\n1\n");
  EXPECT_THROW(read_model(missing), Error);
  std::istringstream shortdata("A 1 1\nBc 1 1\n1\nC 1 1\n1\n");
  EXPECT_THROW(read_model(shortdata), Error);
  std::istringstream feedthrough("A 1 1\n-1\nBc 1 1\n1\nC 1 1\n1\nD 1 1\n0.5\n");
  EXPECT_THROW(read_model(feedthrough), Error);
  std::istringstream unknown("A 1 1\n-1\nQ 1 1\n1\n");
  EXPECT_THROW(read_model(unknown), Error);
  EXPECT_THROW(read_model_file("/nonexistent/model.txt"), Error);
}
