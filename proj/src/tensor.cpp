#include "spellnet/tensor.hpp"

namespace spellnet {

template class GraphT<float>;
template class GraphT<double>;

}  // namespace spellnet
