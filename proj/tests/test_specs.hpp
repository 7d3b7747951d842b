#pragma once

#include "pwalk/config.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk::fixtures {

inline WalkSpec lazy_perturbed() {
  return make_walk_spec(parse_walk_config_text(
      "dim = 1\n"
      "p = 0: 1/2; 1: 1/4; -1: 1/4\n"
      "q = 0: 1/2; 1: 0.3; -1: 0.2\n"));
}

inline WalkSpec lazy_free() {
  return make_walk_spec(parse_walk_config_text(
      "dim = 1\n"
      "unperturbed = true\n"
      "p = 0: 1/2; 1: 1/4; -1: 1/4\n"));
}

// Two-step-range walk on Z^2 with B = I and d = (0.1, 0).
inline WalkSpec planar_identity() {
  return make_walk_spec(parse_walk_config_text(
      "dim = 2\n"
      "p = 0,0: 0.2; 1,0: 0.1; -1,0: 0.1; 0,1: 0.1; 0,-1: 0.1\n"
      "p = 2,0: 0.1; -2,0: 0.1; 0,2: 0.1; 0,-2: 0.1\n"
      "q = 0,0: 0.2; 1,0: 0.15; -1,0: 0.05; 0,1: 0.1; 0,-1: 0.1\n"
      "q = 2,0: 0.1; -2,0: 0.1; 0,2: 0.1; 0,-2: 0.1\n"));
}

// Asymmetric support in 1-D (radius 2 steps, skewed exit law).
inline WalkSpec wide_perturbed() {
  return make_walk_spec(parse_walk_config_text(
      "dim = 1\n"
      "p = 0: 0.4; 1: 0.2; -1: 0.2; 2: 0.1; -2: 0.1\n"
      "q = 0: 0.4; 1: 0.3; -1: 0.1; 2: 0.15; -2: 0.05\n"));
}

// Non-diagonal covariance on Z^2.
inline WalkSpec planar_skewed() {
  return make_walk_spec(parse_walk_config_text(
      "dim = 2\n"
      "p = 0,0: 0.4; 1,0: 0.1; -1,0: 0.1; 0,1: 0.1; 0,-1: 0.1; 1,1: 0.1; -1,-1: 0.1\n"
      "q = 0,0: 0.4; 1,0: 0.12; -1,0: 0.08; 0,1: 0.1; 0,-1: 0.1; 1,1: 0.13; -1,-1: 0.07\n"));
}

}  // namespace pwalk::fixtures
