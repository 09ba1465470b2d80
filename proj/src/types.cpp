#include "satreg/types.hpp"

#include <sstream>

namespace satreg {

NearSingularResolvent::NearSingularResolvent(cplx lambda, double sigma_min, double threshold)
    : GateFailure([&] {
        std::ostringstream os;
        os << "near-singular resolvent at lambda = " << format_complex(lambda)
           << " (smallest singular value " << sigma_min << " <= " << threshold << ")";
        return os.str();
      }()),
      lambda_(lambda) {}

TransmissionZero::TransmissionZero(double omega, double condition)
    : GateFailure([&] {
        std::ostringstream os;
        os << "transmission zero near omega = " << omega << ": cond(P_c^kappa) = " << condition;
        return os.str();
      }()),
      omega_(omega) {}

ResolventFailure::ResolventFailure(double omega, const std::string& why)
    : GateFailure("zero-frequency gate failed at omega = " + std::to_string(omega) + ": " + why) {}

std::string format_complex(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace satreg
