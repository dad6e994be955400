#pragma once

#include "sdooop/distance.hpp"
#include "sdooop/ensemble.hpp"
#include "sdooop/errors.hpp"
#include "sdooop/metrics.hpp"
#include "sdooop/model.hpp"
#include "sdooop/observer.hpp"
#include "sdooop/params.hpp"
#include "sdooop/random.hpp"
#include "sdooop/stream_gen.hpp"
#include "sdooop/swknn.hpp"
