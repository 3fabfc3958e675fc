#pragma once

#include "afov/afi/config.hpp"
#include "afov/afi/coverage.hpp"
#include "afov/afi/directional.hpp"
#include "afov/afi/lattice.hpp"
#include "afov/afi/network.hpp"
#include "afov/camera.hpp"
#include "afov/classdict.hpp"
#include "afov/common.hpp"
#include "afov/correspondence.hpp"
#include "afov/eval.hpp"
#include "afov/io.hpp"
#include "afov/projection.hpp"
#include "afov/render.hpp"
#include "afov/rng.hpp"
#include "afov/spatial.hpp"
#include "afov/synth.hpp"
#include "afov/tmp_loss.hpp"
#include "afov/toy_head.hpp"
