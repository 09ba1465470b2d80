#include "satreg/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace satreg {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

void write_block(std::ostream& out, const std::string& name, const Mat& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace

StateSpaceModel read_model(std::istream& in) {
  std::stringstream tokens;
  std::string line;
  while (std::getline(in, line)) tokens << strip_comment(line) << '\n';

  std::map<std::string, Mat> blocks;
  std::string name;
  while (tokens >> name) {
    long rows = -1, cols = -1;
    if (!(tokens >> rows >> cols) || rows < 0 || cols < 0) {
      throw InvalidArgument("model file: bad header for block '" + name + "'");
    }
    if (blocks.count(name)) throw InvalidArgument("model file: duplicate block '" + name + "'");
    Mat m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      for (long j = 0; j < cols; ++j) {
        std::string tok;
        if (!(tokens >> tok)) throw InvalidArgument("model file: block '" + name + "' is truncated");
        try {
          std::size_t used = 0;
          m(i, j) = std::stod(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw InvalidArgument("model file: bad value '" + tok + "' in block '" + name + "'");
        }
      }
    }
    blocks.emplace(name, std::move(m));
  }

  for (const char* req : {"A", "Bc", "C"}) {
    if (!blocks.count(req)) throw InvalidArgument(std::string("model file: missing block '") + req + "'");
  }
  for (const auto& [key, _] : blocks) {
    if (key != "A" && key != "Bc" && key != "Bd" && key != "C" && key != "D" && key != "M") {
      throw InvalidArgument("model file: unknown block '" + key + "'");
    }
  }
  if (auto it = blocks.find("D"); it != blocks.end() && it->second.size() > 0 &&
                                  it->second.cwiseAbs().maxCoeff() != 0.0) {
    throw InvalidArgument("model file: nonzero feedthrough D is not supported");
  }
  const Mat& A = blocks.at("A");
  Mat Bd = blocks.count("Bd") ? blocks.at("Bd") : Mat(A.rows(), 0);
  Mat M = blocks.count("M") ? blocks.at("M") : Mat();
  return StateSpaceModel(A, blocks.at("Bc"), Bd, blocks.at("C"), M);
}

StateSpaceModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open model file '" + path + "'");
  return read_model(in);
}

void write_model(std::ostream& out, const StateSpaceModel& model) {
  out << "# state-space model: x' = A x + Bc u + Bd w, y = C x\n";
  write_block(out, "A", model.A());
  write_block(out, "Bc", model.Bc());
  write_block(out, "Bd", model.Bd());
  write_block(out, "C", model.C());
  if (model.has_gram()) write_block(out, "M", model.gram());
}

void write_model_file(const std::string& path, const StateSpaceModel& model) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write model file '" + path + "'");
  write_model(out, model);
}

}  // namespace satreg
