// Copyright 2026 The CodeConcept Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CODECONCEPT_STUB_ACTIVATIONS_H_
#define CODECONCEPT_STUB_ACTIVATIONS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "codeconcept/activation_io.h"
#include "codeconcept/corpus.h"
#include "codeconcept/perturb.h"

namespace codeconcept {

struct StubOptions {
  int64_t dim = 32;
  uint64_t seed = 42;
  int layer = 0;
  std::string model_id = "stub-hashed-features";
};

// Model-free stand-in for real activations: each token's vector mixes
// seeded hash embeddings of its text, its syntactic tag and its neighbours'
// texts. Rows follow the token order of `tokens`.
ActivationDataset StubActivations(
    const std::vector<std::vector<TaggedToken>>& tokens,
    const StubOptions& options);

// Activations for a perturbed corpus that reuse, row for row, the vectors of
// the corresponding original tokens. Perturbed tokens without a counterpart
// get fresh stub vectors. Throws DataError when a perturbed snippet has no
// correspondence map or a mapped original token has no row.
ActivationDataset TransferActivations(
    const ActivationDataset& original,
    const std::vector<std::vector<TaggedToken>>& perturbed_tokens,
    const std::vector<CorrespondenceMap>& maps, const StubOptions& options);

}  // namespace codeconcept

#endif  // CODECONCEPT_STUB_ACTIVATIONS_H_
