// Copyright 2026 the kgsr authors
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

#include "kgsr/error.hpp"

namespace kgsr {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DanglingEntity: return "DanglingEntity";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::UnknownEntity: return "UnknownEntity";
        case ErrorCode::UnknownRelation: return "UnknownRelation";
        case ErrorCode::NoNegativeAvailable: return "NoNegativeAvailable";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::EmptyTagList: return "EmptyTagList";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::IsolatedNode: return "IsolatedNode";
        case ErrorCode::MissingState: return "MissingState";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorCode::DivergedLoss: return "DivergedLoss";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::EmptyStore: return "EmptyStore";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NoSamples: return "NoSamples";
        case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
        case ErrorCode::TooFewUsers: return "TooFewUsers";
        case ErrorCode::EmptyTruth: return "EmptyTruth";
        case ErrorCode::NoQueries: return "NoQueries";
        case ErrorCode::EmptyColumn: return "EmptyColumn";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace kgsr
