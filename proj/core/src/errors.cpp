#include "effcond/errors.hpp"

namespace effcond {

Error::Error(ErrorKind kind, std::string name, const std::string &detail)
    : std::runtime_error(name + ": " + detail), kind_(kind),
      name_(std::move(name)) {}

} // namespace effcond
