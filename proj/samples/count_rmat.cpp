/*
Copyright 2026 The trigrid Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Generates a small RMAT graph, counts its triangles on 9 simulated ranks
// and checks the result against the sequential reference.

#include <iostream>

#include "trigrid/oracle.hpp"
#include "trigrid/pipeline.hpp"
#include "trigrid/rmat.hpp"

int main() {
  trigrid::RmatParams params;
  params.scale = 10;
  params.edge_factor = 16;
  params.seed = 42;
  const trigrid::EdgeList graph = trigrid::generate_rmat(params);

  trigrid::RunConfig config;
  config.ranks = 9;
  const trigrid::RunReport report = trigrid::run_pipeline(graph, config);

  const auto expected = trigrid::oracle::count_serial(graph);
  std::cout << "n=" << graph.n << " m=" << graph.edges.size() << " triangles=" << report.triangles
            << " reference=" << expected << '\n';
  std::cout << trigrid::report_text(report);
  return report.triangles == expected ? 0 : 1;
}
