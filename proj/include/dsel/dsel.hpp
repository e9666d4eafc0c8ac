#pragma once

#include "dsel/compare.hpp"
#include "dsel/delegated.hpp"
#include "dsel/direct.hpp"
#include "dsel/errors.hpp"
#include "dsel/format.hpp"
#include "dsel/gauss.hpp"
#include "dsel/mc.hpp"
#include "dsel/population.hpp"
