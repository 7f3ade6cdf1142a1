#pragma once

#include "tpid/baselines.hpp"
#include "tpid/corpus.hpp"
#include "tpid/embedstore.hpp"
#include "tpid/error.hpp"
#include "tpid/evaluate.hpp"
#include "tpid/inference.hpp"
#include "tpid/models.hpp"
#include "tpid/nn/adam.hpp"
#include "tpid/nn/autodiff.hpp"
#include "tpid/nn/checkpoint_io.hpp"
#include "tpid/nn/layers.hpp"
#include "tpid/nn/tensor.hpp"
#include "tpid/rng.hpp"
#include "tpid/supervision.hpp"
#include "tpid/synthetic.hpp"
#include "tpid/text.hpp"
#include "tpid/train.hpp"
