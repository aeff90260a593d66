#pragma once

#include "dynrepset/circuit.hpp"
#include "dynrepset/factorization.hpp"
#include "dynrepset/kpath.hpp"
#include "dynrepset/oracle.hpp"
#include "dynrepset/pseudorandom.hpp"
#include "dynrepset/repset.hpp"
#include "dynrepset/semiring.hpp"
#include "dynrepset/util.hpp"
