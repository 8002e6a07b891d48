#ifndef HERMWAVE_HPP
#define HERMWAVE_HPP

#include "hermwave/error.hpp"
#include "hermwave/hermite.hpp"
#include "hermwave/field.hpp"
#include "hermwave/operators.hpp"
#include "hermwave/dvwe.hpp"
#include "hermwave/ssprk3.hpp"
#include "hermwave/diagnostics.hpp"
#include "hermwave/scenarios.hpp"
#include "hermwave/io.hpp"
#include "hermwave/config.hpp"
#include "hermwave/runner.hpp"

#endif
