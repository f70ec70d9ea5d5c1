#ifndef GNNFLOW_TESTS_TEST_UTIL_HPP_
#define GNNFLOW_TESTS_TEST_UTIL_HPP_

#include <memory>

#include "gnnflow/graph.hpp"
#include "gnnflow/taxonomy.hpp"

namespace gnnflow::testing_util {

// Five vertices, six directed edges and five self loops: eleven in total.
inline CsrGraph fig1_graph(std::uint32_t features = 4) {
  return with_self_loops(build_csr(5, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {3, 4}, {4, 3}}, features));
}

inline std::shared_ptr<const CsrGraph> share(CsrGraph g) {
  return std::make_shared<const CsrGraph>(std::move(g));
}

inline DataflowSpec tiled(const char* notation, TileConfig t) {
  DataflowSpec s = parse_dataflow(notation);
  s.tiles = t;
  return s;
}

}  // namespace gnnflow::testing_util

#endif  // GNNFLOW_TESTS_TEST_UTIL_HPP_
