#include "meanlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace meanlab {

unsigned resolve_thread_count(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("MEANLAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

} // namespace meanlab
