#pragma once

#include "nlfm/acf.hpp"
#include "nlfm/banded.hpp"
#include "nlfm/curve_fit.hpp"
#include "nlfm/erf.hpp"
#include "nlfm/error.hpp"
#include "nlfm/fft.hpp"
#include "nlfm/waveform.hpp"
#include "nlfm/window.hpp"
