#pragma once

#include "monolab/alternative.hpp"
#include "monolab/bundle.hpp"
#include "monolab/catalog.hpp"
#include "monolab/config.hpp"
#include "monolab/core.hpp"
#include "monolab/cycles.hpp"
#include "monolab/experiments.hpp"
#include "monolab/io.hpp"
#include "monolab/order_space.hpp"
#include "monolab/parabolic.hpp"
#include "monolab/quadrature.hpp"
#include "monolab/random.hpp"
#include "monolab/spectral.hpp"
#include "monolab/systems.hpp"
