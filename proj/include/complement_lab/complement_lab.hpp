#pragma once

#include "complement_lab/complementarity.hpp"
#include "complement_lab/duality.hpp"
#include "complement_lab/errors.hpp"
#include "complement_lab/hilbert.hpp"
#include "complement_lab/optics.hpp"
#include "complement_lab/scene_file.hpp"
#include "complement_lab/spectral.hpp"
#include "complement_lab/tolerances.hpp"
