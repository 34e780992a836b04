#pragma once

#include "blocksort.hpp"
#include "driver.hpp"
#include "exact_log.hpp"
#include "heaps.hpp"
#include "metered.hpp"
#include "params.hpp"
#include "ptrmem.hpp"
#include "select.hpp"
