#pragma once

#include "rieszmax/grid.hpp"
#include "rieszmax/rearrange.hpp"
#include "rieszmax/integrand.hpp"
#include "rieszmax/riesz.hpp"
#include "rieszmax/search.hpp"
#include "rieszmax/instance.hpp"
