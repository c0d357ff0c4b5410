// Copyright 2026 The qsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qsplit/train.hpp"

namespace testsupport {

/// Ledger snapshot folded into the same shape as a prediction.
inline qsplit::LedgerPrediction observed_ledger(const qsplit::RunResult &r) {
    using qsplit::Direction;
    using qsplit::MessageKind;
    qsplit::LedgerPrediction o;
    for (const auto &[key, c] : r.ledger) {
        const auto [client, dir, kind] = key;
        (dir == Direction::Upload ? o.upload_framing : o.download_framing) += c.framing_bytes;
        switch (kind) {
            case MessageKind::FeatureUpload: o.feature_upload += c.payload_bytes; break;
            case MessageKind::LabelUpload: o.label_upload += c.payload_bytes; break;
            case MessageKind::FeatureGradDownload: o.grad_download += c.payload_bytes; break;
            case MessageKind::ParamUpload: o.param_upload += c.payload_bytes; break;
            case MessageKind::ParamBroadcast: o.param_broadcast += c.payload_bytes; break;
            case MessageKind::Control: break;
        }
    }
    return o;
}

inline bool same_ledger(const qsplit::LedgerPrediction &a, const qsplit::LedgerPrediction &b) {
    return a.feature_upload == b.feature_upload && a.label_upload == b.label_upload &&
           a.grad_download == b.grad_download && a.param_upload == b.param_upload &&
           a.param_broadcast == b.param_broadcast && a.upload_framing == b.upload_framing &&
           a.download_framing == b.download_framing;
}

}  // namespace testsupport
