/**
 * @file unirigid.hpp
 * @brief Umbrella header: dimensional and universal rigidity via iterated PSD stresses.
 */
#pragma once

#include "unirigid/numerics.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/stress.hpp"
#include "unirigid/reduction.hpp"
#include "unirigid/certificate.hpp"
#include "unirigid/io.hpp"
