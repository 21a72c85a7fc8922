#pragma once

namespace mbh {

// Side of an oriented cut or ray: plus is the left (counterclockwise) side.
// none means the point must not lie on a cut.
enum class Side { none, plus, minus };

}  // namespace mbh
