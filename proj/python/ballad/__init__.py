# Copyright 2026 The Ballad Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Label budget allocation between active learning and learning to reject."""

from ._core import (  # noqa: F401
    BalladError,
    Dataset,
    __version__,
    auc,
    binarize,
    check_costs,
    confidence,
    cosine_reward,
    empirical_cost,
    entropy_reward,
    entropy_term,
    generate_synthetic,
    iforest_scores,
    load_dataset,
    optimize_tau,
    predict_trinary,
    quantile_threshold,
    reject_probability,
    rejection_rate,
    run,
    squash,
    stratified_split,
    write_dataset,
)
