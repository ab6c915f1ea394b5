#pragma once

#include "tdm/baseline.hpp"
#include "tdm/blob.hpp"
#include "tdm/calibration.hpp"
#include "tdm/dipole.hpp"
#include "tdm/field.hpp"
#include "tdm/flow.hpp"
#include "tdm/image.hpp"
#include "tdm/io.hpp"
#include "tdm/nhhd.hpp"
#include "tdm/operators.hpp"
#include "tdm/simulator.hpp"
