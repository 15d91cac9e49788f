#pragma once

#include <stdexcept>
#include <string>

namespace s6v {

class Error : public std::runtime_error {
public:
    Error(const char* kind, const std::string& what)
        : std::runtime_error(std::string(kind) + ": " + what), kind_(kind) {}
    const char* kind() const noexcept { return kind_; }

private:
    const char* kind_;
};

#define S6V_DECLARE_ERROR(Name)                                                \
    struct Name : Error {                                                      \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

S6V_DECLARE_ERROR(WidthTooLarge);
S6V_DECLARE_ERROR(SlopeOutOfLiquidRegion);
S6V_DECLARE_ERROR(ParameterOutOfRange);
S6V_DECLARE_ERROR(DegenerateWeight);
S6V_DECLARE_ERROR(PrecisionExhausted);
S6V_DECLARE_ERROR(RoutesDisagree);
S6V_DECLARE_ERROR(DomainTooSmall);
S6V_DECLARE_ERROR(NotConverged);
S6V_DECLARE_ERROR(NewtonDiverged);
S6V_DECLARE_ERROR(PoleDetected);
S6V_DECLARE_ERROR(OutOfRange);
S6V_DECLARE_ERROR(ArgumentOutOfArccosRange);
S6V_DECLARE_ERROR(MassInconsistent);
S6V_DECLARE_ERROR(FitFailed);
S6V_DECLARE_ERROR(QuadratureNotConverged);
S6V_DECLARE_ERROR(RegimeMismatch);
S6V_DECLARE_ERROR(ConfigInvalid);

#undef S6V_DECLARE_ERROR

} // namespace s6v
