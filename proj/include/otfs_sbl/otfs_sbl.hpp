#pragma once

#include "otfs_sbl/error.hpp"
#include "otfs_sbl/linalg.hpp"
#include "otfs_sbl/frame.hpp"
#include "otfs_sbl/rng.hpp"
#include "otfs_sbl/channel.hpp"
#include "otfs_sbl/pilot.hpp"
#include "otfs_sbl/estimators.hpp"
#include "otfs_sbl/bounds.hpp"
#include "otfs_sbl/detection.hpp"
#include "otfs_sbl/harness.hpp"
