#include "somor/instrumentation.hpp"

namespace somor::instrumentation {

Counters& counters() {
  thread_local Counters c;
  return c;
}

}  // namespace somor::instrumentation
