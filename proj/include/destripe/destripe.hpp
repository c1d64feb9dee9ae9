#pragma once

#include "destripe/errors.hpp"
#include "destripe/image.hpp"
#include "destripe/fft.hpp"
#include "destripe/wedge.hpp"
#include "destripe/tv.hpp"
#include "destripe/recon.hpp"
#include "destripe/synth.hpp"
#include "destripe/metrics.hpp"
#include "destripe/sweep.hpp"
#include "destripe/io.hpp"
