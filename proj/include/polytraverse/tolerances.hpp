// Numeric policy knobs. Defaults are the documented artifact constants;
// the CLI exposes flags to override them.
#pragma once

namespace polytraverse {

struct Tolerances {
    // Margin used to realize strict inequalities: an "open" constraint
    // a.x + b <= 0 is solved as a.x + b <= -interior_margin. Polytope
    // emptiness is decided against this margin, which makes "non-empty
    // interior" a deterministic predicate.
    double interior_margin = 1e-7;

    // Satisfaction slack for closed constraints and general float noise.
    double numeric = 1e-9;

    // Half-width of the sentinel box that stands in for R^P when no
    // traversing region is supplied, so every LP stays bounded.
    double sentinel_half_width = 1e6;
};

}  // namespace polytraverse
