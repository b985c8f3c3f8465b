#pragma once

namespace rgs {

/// Worker threads used by column-parallel kernels (currently
/// SketchOperator::apply_block). Defaults to 1. Results do not depend on the
/// thread count: every column is reduced by one thread in a fixed order.
void set_num_threads(int n);
int num_threads();

/// Reads RGS_NUM_THREADS; leaves the setting unchanged when unset or invalid.
void init_threads_from_env();

}  // namespace rgs
