#pragma once

#include <stdexcept>
#include <string>

namespace wfp {

// Base class for all library errors. `code()` is a stable machine-readable
// identifier; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define WFP_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}  \
    }

WFP_DEFINE_ERROR(InvalidDensity);
WFP_DEFINE_ERROR(GridMismatch);
WFP_DEFINE_ERROR(SingularDensity);
WFP_DEFINE_ERROR(UnknownCatalogEntry);
WFP_DEFINE_ERROR(NotConvex);
WFP_DEFINE_ERROR(TooLarge);
WFP_DEFINE_ERROR(NoConvergence);
WFP_DEFINE_ERROR(UnstableStep);
WFP_DEFINE_ERROR(DivergedParticle);
WFP_DEFINE_ERROR(CloudMismatch);
WFP_DEFINE_ERROR(NotAntisymmetric);
WFP_DEFINE_ERROR(NotPositive);
WFP_DEFINE_ERROR(NumericalFailure);
WFP_DEFINE_ERROR(InvalidSeries);
WFP_DEFINE_ERROR(InvalidParameter);

#undef WFP_DEFINE_ERROR

}  // namespace wfp
