"""Trust in vehicular social networks over a social evolving graph."""
from .paillier import (Ciphertext, PaillierPrivateKey, PaillierPublicKey, decode_signed, decrypt,
                       encode_signed, encrypt, generate_keypair, hom_add, keypair_from_primes)
from .seg import (UNBOUNDED, InterestProfile, SegSnapshot, SegTimeline, SocialEdge, Thresholds,
                  TrustWeights, VehicleNode, build_snapshot, can_establish, degree_centrality,
                  direct_trust, expected_link_duration, homophily, is_journey)
from .mobility import HighwayConfig, MotionCase, VehicleState, classify_motion
from .routing import RouteSet, seg_dijkstra
from .trust import IndirectTrustResult, OpinionRequest, hop_weight, initiate

__all__ = [
    "Ciphertext", "PaillierPrivateKey", "PaillierPublicKey", "decode_signed", "decrypt",
    "encode_signed", "encrypt", "generate_keypair", "hom_add", "keypair_from_primes",
    "UNBOUNDED", "InterestProfile", "SegSnapshot", "SegTimeline", "SocialEdge", "Thresholds",
    "TrustWeights", "VehicleNode", "build_snapshot", "can_establish", "degree_centrality",
    "direct_trust", "expected_link_duration", "homophily", "is_journey",
    "HighwayConfig", "MotionCase", "VehicleState", "classify_motion",
    "RouteSet", "seg_dijkstra", "IndirectTrustResult", "OpinionRequest", "hop_weight", "initiate",
]
__version__ = "0.1.0"
