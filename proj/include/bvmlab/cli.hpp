#pragma once

namespace bvmlab {

// Exit status: 0 success, 2 malformed config, 3 violated hypothesis, 1 otherwise.
int dispatch(int argc, char** argv);

}  // namespace bvmlab
