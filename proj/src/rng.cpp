#include "fsqkd/rng.hpp"

namespace fsqkd {

static_assert(Rng::substream(1, Stream::alice_bits, 0)() !=
              Rng::substream(1, Stream::bob_choice, 0)());

}  // namespace fsqkd
