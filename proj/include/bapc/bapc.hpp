#pragma once

#include "bapc/base_model.hpp"
#include "bapc/corrector.hpp"
#include "bapc/criteria.hpp"
#include "bapc/dataset.hpp"
#include "bapc/drag.hpp"
#include "bapc/engine.hpp"
#include "bapc/errors.hpp"
#include "bapc/forest.hpp"
#include "bapc/io.hpp"
#include "bapc/mlp.hpp"
#include "bapc/newsvendor.hpp"
#include "bapc/newsvendor_link.hpp"
#include "bapc/ols.hpp"
#include "bapc/rng.hpp"
#include "bapc/smoothing.hpp"
#include "bapc/tuning.hpp"
