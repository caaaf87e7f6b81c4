#pragma once

// Umbrella header for the receive-chain modeling library.

#include "rxchain/units.hpp"
#include "rxchain/error.hpp"
#include "rxchain/touchstone.hpp"
#include "rxchain/model.hpp"
#include "rxchain/chain_file.hpp"
#include "rxchain/cascade.hpp"
#include "rxchain/intermod.hpp"
#include "rxchain/twotone.hpp"
#include "rxchain/sweeps.hpp"
#include "rxchain/report.hpp"
