#pragma once

#include "rirsynth/analysis.hpp"
#include "rirsynth/core.hpp"
#include "rirsynth/dataset.hpp"
#include "rirsynth/errors.hpp"
#include "rirsynth/fft.hpp"
#include "rirsynth/ism.hpp"
#include "rirsynth/rng.hpp"
#include "rirsynth/sampler.hpp"
#include "rirsynth/signals.hpp"
#include "rirsynth/synth.hpp"
#include "rirsynth/tail.hpp"
#include "rirsynth/wav.hpp"
