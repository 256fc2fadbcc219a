// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

namespace wpinn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wpinn
