#pragma once

// Contest specifications from JSON. Schema (unknown keys are errors):
//
//   {
//     "agents": [{"family": "uniform" | "atom_uniform" | "power" | "piecewise_polynomial",
//                 "params": {...}}, ...],
//     "payment": {"family": "monomial", "c": 1, "a": 2, "d": 0},
//     "value_scale": {"gamma": 1},                         optional, gamma = 1
//     "lambda": 0.1,
//     "numerics": {"steps": 4096, "abs_tol": 1e-12, "rel_tol": 1e-10}   optional
//   }
//
// Family params: uniform {}; atom_uniform {"atom"}; power {"alpha"};
// piecewise_polynomial {"breakpoints", "coefficients"}. Every family also
// accepts "atom" (mass at the lower end point) and "support": [lo, hi].

#include <string>
#include <string_view>

#include "allpay/contest.hpp"

namespace allpay {

inline constexpr std::string_view kCaseStudyPreset = "paper-case-study";

/// Parses and validates a JSON document. Throws ConfigError.
ContestSpec parse_config(const std::string& text);

/// Reads a config file, or returns the built-in preset when `source` names it
/// (lambda 0.1). Throws ConfigError.
ContestSpec load_config(const std::string& source);

/// The JSON form of a spec, accepted back by parse_config.
std::string dump_config(const ContestSpec& spec);

}  // namespace allpay
