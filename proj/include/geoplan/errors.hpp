#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace geoplan {

/// Base of every error raised by the library. Carries an optional
/// integration time so failures deep inside a trajectory can be located.
class GeoplanError : public std::runtime_error
{
public:
    explicit GeoplanError(const std::string& what)
        : std::runtime_error(what)
        , message_(what)
    {}

    void set_time(double t)
    {
        time_ = t;
        message_ = std::string(std::runtime_error::what()) + " (at t = " + std::to_string(t) + ")";
    }

    std::optional<double> time() const { return time_; }

    const char* what() const noexcept override { return message_.c_str(); }

private:
    std::optional<double> time_;
    std::string message_;
};

#define GEOPLAN_DEFINE_ERROR(Name)                                                                 \
    class Name : public GeoplanError                                                               \
    {                                                                                              \
    public:                                                                                        \
        explicit Name(const std::string& what)                                                     \
            : GeoplanError(#Name ": " + what)                                                      \
        {}                                                                                         \
    };

GEOPLAN_DEFINE_ERROR(NonSkewInput)
GEOPLAN_DEFINE_ERROR(NotARotation)
GEOPLAN_DEFINE_ERROR(AntipodalSingularity)
GEOPLAN_DEFINE_ERROR(TooFarFromGroup)
GEOPLAN_DEFINE_ERROR(NotPositiveDefinite)
GEOPLAN_DEFINE_ERROR(InvalidObstacle)
GEOPLAN_DEFINE_ERROR(NotHorizontal)
GEOPLAN_DEFINE_ERROR(NotOnSphere)
GEOPLAN_DEFINE_ERROR(FiberDegenerate)
GEOPLAN_DEFINE_ERROR(AntipodalLiftAmbiguity)
GEOPLAN_DEFINE_ERROR(NonFiniteState)
GEOPLAN_DEFINE_ERROR(InvalidArgument)
GEOPLAN_DEFINE_ERROR(ParseError)
GEOPLAN_DEFINE_ERROR(ValidationError)
GEOPLAN_DEFINE_ERROR(IoError)

#undef GEOPLAN_DEFINE_ERROR

} // namespace geoplan
