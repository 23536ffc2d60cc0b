// Umbrella header.
#pragma once

#include "redset/convex.hpp"
#include "redset/hermitian.hpp"
#include "redset/inner_bound.hpp"
#include "redset/io.hpp"
#include "redset/lanczos.hpp"
#include "redset/mps.hpp"
#include "redset/nelder_mead.hpp"
#include "redset/outer_bound.hpp"
#include "redset/parallel.hpp"
#include "redset/pauli.hpp"
#include "redset/probe.hpp"
#include "redset/report.hpp"
#include "redset/xy_exact.hpp"
