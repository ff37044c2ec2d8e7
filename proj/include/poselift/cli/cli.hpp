// Copyright 2026 The poselift Authors.
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


#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "poselift/model/train.hpp"

namespace poselift::cli {

/// Runs one command line, program name excluded. Errors are written to
/// `err` as "error: <kind>: <message>". Returns 0 on success, 1 on a
/// library error and 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// predict_records sharded over `workers` threads in whole 64-record chunks,
/// which keeps the result identical to a single call.
std::vector<model::Prediction> predict_parallel(const model::PoseNet& net,
                                                const model::MultiTaskHead* head,
                                                std::span<const SampleRecord> records,
                                                model::AttrSource source, std::size_t workers);

}  // namespace poselift::cli
