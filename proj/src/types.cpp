#include "emosig/types.hpp"

namespace emosig {

std::string channel_name(Channel c) {
    switch (c) {
        case Channel::Ecg: return "ecg";
        case Channel::Bvp: return "bvp";
        case Channel::AccZ: return "acc_z";
        case Channel::Scg: return "scg";
        case Channel::Rsp: return "rsp";
        case Channel::Adr: return "adr";
        case Channel::Eda: return "eda";
        case Channel::Skt: return "skt";
        case Channel::Emg: return "emg";
        case Channel::Eog: return "eog";
    }
    return "?";
}

std::optional<Channel> parse_channel(const std::string& name) {
    if (name == "ecg") return Channel::Ecg;
    if (name == "bvp") return Channel::Bvp;
    if (name == "acc_z") return Channel::AccZ;
    if (name == "scg") return Channel::Scg;
    if (name == "rsp") return Channel::Rsp;
    if (name == "adr") return Channel::Adr;
    if (name == "eda") return Channel::Eda;
    if (name == "skt") return Channel::Skt;
    if (name == "emg") return Channel::Emg;
    if (name == "eog") return Channel::Eog;
    return std::nullopt;
}

std::string dimension_name(Dimension d) {
    return d == Dimension::Valence ? "valence" : "arousal";
}

double rating_for(const SamRatings& r, Dimension d) {
    return d == Dimension::Valence ? r.valence : r.arousal;
}

}  // namespace emosig
