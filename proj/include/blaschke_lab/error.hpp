#ifndef BLASCHKE_LAB_ERROR_HPP
#define BLASCHKE_LAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace blaschke_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BLASCHKE_LAB_ERROR(Name)                                      \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

BLASCHKE_LAB_ERROR(InvalidPolygon)
BLASCHKE_LAB_ERROR(NotCentered)
BLASCHKE_LAB_ERROR(DegenerateSpan)
BLASCHKE_LAB_ERROR(OriginOutside)
BLASCHKE_LAB_ERROR(InvalidFunction)
BLASCHKE_LAB_ERROR(SingularTransform)
BLASCHKE_LAB_ERROR(EmptyLevel)
BLASCHKE_LAB_ERROR(UnboundedSupportTerm)
BLASCHKE_LAB_ERROR(CoercivityViolation)
BLASCHKE_LAB_ERROR(NotAdmissible)
BLASCHKE_LAB_ERROR(LayoutMismatch)
BLASCHKE_LAB_ERROR(InfeasibleBoundary)

#undef BLASCHKE_LAB_ERROR

} // namespace blaschke_lab

#endif
