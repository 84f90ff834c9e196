#ifndef TOPREC_ERRORS_HPP
#define TOPREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace toprec {

// Every error carries a short machine-readable kind next to the message so the
// CLI can map it onto an exit code.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define TOPREC_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

TOPREC_DEFINE_ERROR(NonRational);
TOPREC_DEFINE_ERROR(DivisionByZero);
TOPREC_DEFINE_ERROR(NonInvertibleLeading);
TOPREC_DEFINE_ERROR(BranchError);
TOPREC_DEFINE_ERROR(UnknownGenerator);
TOPREC_DEFINE_ERROR(DegenerateDifference);
TOPREC_DEFINE_ERROR(UnknownTorsionDifference);
TOPREC_DEFINE_ERROR(UnsupportedSubfamily);
TOPREC_DEFINE_ERROR(NotHyperelliptic);
TOPREC_DEFINE_ERROR(NotImplementedForGeometry);
TOPREC_DEFINE_ERROR(UnresolvedPoint);
TOPREC_DEFINE_ERROR(DegenerateRamification);
TOPREC_DEFINE_ERROR(OrderTooLow);
TOPREC_DEFINE_ERROR(InvariantViolation);
TOPREC_DEFINE_ERROR(ConfigError);

#undef TOPREC_DEFINE_ERROR

}  // namespace toprec

#endif
