#pragma once

#include "dislocore/vec2.hpp"

namespace dislocore {

/// Interior harmonic function with an analytic gradient.
struct Harmonic {
    virtual ~Harmonic() = default;
    virtual double value(Vec2 x) const = 0;
    virtual Vec2 grad(Vec2 x) const = 0;
};

} // namespace dislocore
