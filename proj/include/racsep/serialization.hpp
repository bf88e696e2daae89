#pragma once

// Plain-text formats for parameters, tensors and tensor networks. Exact
// entries are written as "num/den", doubles in shortest round-trip form, so
// write(read(write(x))) is byte-identical to write(x).

#include <iosfwd>
#include <string>

#include "racsep/rac.hpp"
#include "racsep/tensor.hpp"
#include "racsep/tensor_network.hpp"

namespace racsep {

void write_params(std::ostream& os, const RacParams& p);
[[nodiscard]] RacParams read_params(std::istream& is);

void write_tensor(std::ostream& os, const DenseTensor& t);
[[nodiscard]] DenseTensor read_tensor(std::istream& is);

/// Rejects empty graphs and node labels containing whitespace.
void write_graph(std::ostream& os, const TnGraph& g);
[[nodiscard]] TnGraph read_graph(std::istream& is);

/// File wrappers; failures raise IoError naming the path.
void save_text(const std::string& path, const std::string& contents);
[[nodiscard]] std::string load_text(const std::string& path);

}  // namespace racsep
