#pragma once

#include "pwalk/asymptotics.hpp"
#include "pwalk/compare.hpp"
#include "pwalk/compensated.hpp"
#include "pwalk/config.hpp"
#include "pwalk/edgeworth.hpp"
#include "pwalk/errors.hpp"
#include "pwalk/exact_engine.hpp"
#include "pwalk/fft.hpp"
#include "pwalk/io.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/multi_index.hpp"
#include "pwalk/polynomial.hpp"
#include "pwalk/rational.hpp"
#include "pwalk/rng.hpp"
#include "pwalk/simulate.hpp"
#include "pwalk/special_fn.hpp"
#include "pwalk/spectral.hpp"
#include "pwalk/walk_model.hpp"
