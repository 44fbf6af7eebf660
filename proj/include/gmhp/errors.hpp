#ifndef GMHP_ERRORS_HPP
#define GMHP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gmhp {

// Failure of a numerical routine (non-convergent quadrature, ill-conditioned
// solve). Carries a human-readable diagnostic.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmhp

#endif
