#pragma once

#include "inar_lab/random.hpp"
#include "inar_lab/innovations.hpp"
#include "inar_lab/process.hpp"
#include "inar_lab/cls.hpp"
#include "inar_lab/limit_laws.hpp"
#include "inar_lab/ks.hpp"
#include "inar_lab/parallel.hpp"
#include "inar_lab/montecarlo.hpp"
#include "inar_lab/io.hpp"
