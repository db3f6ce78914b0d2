#include "aniso/rng.hpp"

namespace aniso {

static_assert(derive_seed(0, "", 0) != derive_seed(0, "", 1));
static_assert(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));

}  // namespace aniso
