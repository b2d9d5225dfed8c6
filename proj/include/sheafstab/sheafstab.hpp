#pragma once

#include "chambers.hpp"
#include "cli.hpp"
#include "hilbert.hpp"
#include "hn.hpp"
#include "io.hpp"
#include "models.hpp"
#include "numring.hpp"
#include "rational.hpp"
#include "stability.hpp"
#include "svg.hpp"
#include "walls.hpp"
