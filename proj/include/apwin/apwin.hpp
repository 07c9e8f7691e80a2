#pragma once

#include "apwin/cps.hpp"
#include "apwin/dynamics.hpp"
#include "apwin/independence.hpp"
#include "apwin/interval_set.hpp"
#include "apwin/numbers.hpp"
#include "apwin/partitions.hpp"
#include "apwin/pseudolines.hpp"
#include "apwin/serialize.hpp"
#include "apwin/window.hpp"
