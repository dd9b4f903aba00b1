#ifndef GRAMSHIELD_INDEX_IO_HPP
#define GRAMSHIELD_INDEX_IO_HPP

#include <memory>

#include "gramshield/config.hpp"
#include "gramshield/ngram.hpp"

namespace gramshield {

// Everything a perturbation run needs, built once by the `build` command.
struct BuildIndex {
  PoiCatalog catalog;
  RegionSet regions;
  NGramFamily grams;
  RunConfig params;
};

BuildIndex build_index(PoiCatalog catalog, const RunConfig& config);

// Self-describing JSON snapshot (index.json inside `dir`). Serialization
// is fully ordered, so identical inputs give byte-identical files.
void save_index(const BuildIndex& index, const std::string& dir);
BuildIndex load_index(const std::string& dir);

}  // namespace gramshield

#endif
