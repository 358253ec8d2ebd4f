#include "amtk/adapters.hpp"
#include "amtk/client.hpp"
#include "amtk/extract.hpp"
#include "amtk/merge.hpp"
#include "amtk/metrics.hpp"
#include "amtk/parser.hpp"
#include "amtk/prompt.hpp"
#include "amtk/rng.hpp"
#include "amtk/run_manifest.hpp"
#include "amtk/sampler.hpp"
#include "amtk/scoring.hpp"
#include "amtk/sha256.hpp"
#include "amtk/tensor.hpp"
#include "amtk/util.hpp"
int main() { return 0; }
