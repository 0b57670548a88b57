#include "cvhar/error.hpp"

namespace cvhar {

void throw_domain(const std::string& what) { throw DomainError(what); }

}  // namespace cvhar
