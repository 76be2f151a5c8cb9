//! Reference values for numbered shelves with complete memory
//! (model 4): small optima and sampled cost curves.

/// `m~_opt(n)` for `n = 1..=35`.
pub const M_OPT_APPROX: [usize; 35] = [
    1, 2, 3, 4, 5, 6, 7, 8, 8, 8, 9, 9, 9, 9, 9, 10, 10, 10, 10, 11, 11, 11, 11, 11, 11, 12, 12, 12, 12,
    12, 12, 12, 12, 13, 13,
];

/// `m_opt(n)` for `n = 1..=35`.
pub const M_OPT: [usize; 35] = [
    1, 2, 3, 4, 5, 6, 7, 8, 8, 8, 9, 9, 9, 10, 10, 10, 10, 10, 11, 11, 11, 11, 11, 12, 12, 12, 12, 12,
    12, 12, 13, 13, 13, 13, 13,
];

/// `F(m; 20)` for `m = 1..=20`.
pub const F_EXACT_N20: [f64; 20] = [
    7.22386658784,
    7.11746171245,
    6.99458276474,
    6.87412332227,
    6.76290728722,
    6.66429243642,
    6.58025242957,
    6.51148889616,
    6.45548860194,
    6.40141803534,
    6.42438638139,
    6.43856591688,
    6.47837320768,
    6.54701810181,
    6.6488346379,
    6.79004794699,
    6.98028331989,
    7.23614856613,
    7.591830101,
    8.14481872387,
];

/// `F~(m; 20)` for `m = 1..=20`.
pub const F_APPROX_N20: [f64; 20] = [
    7.22386658784,
    7.06428026507,
    6.91930417664,
    6.7894603062,
    6.67533965227,
    6.57761715255,
    6.49707119509,
    6.43460959719,
    6.39130492667,
    6.36844369696,
    6.36759683884,
    6.39072405851,
    6.44033465613,
    6.51974771885,
    6.63353955542,
    6.78837608417,
    6.9947340548,
    7.27103874741,
    7.65624823248,
    8.26911778588,
];

/// `F~(m; 100)` for `m = 1..=100`.
pub const F_APPROX_N100: [f64; 100] = [
    11.4495871952, 11.3970767067, 11.3477547413, 11.3016446176, 11.2587701967, 11.2191559009,
    11.1828267338, 11.1498083014, 11.1201268339, 11.0938092089, 11.0708829756, 11.0513763802,
    11.0353183926, 11.0227387342, 11.0136679079, 11.0081372284, 11.0061788557, 11.0078258286,
    11.0131121019, 11.0220725837, 11.0347431766, 11.0511608197, 11.0713635342, 11.0953904706,
    11.1232819595, 11.1550795649, 11.1908261408, 11.2305658915, 11.2743444354, 11.3222088727,
    11.3742078578, 11.4303916759, 11.4908123251, 11.5555236034, 11.6245812024, 11.6980428065,
    11.7759681999, 11.8584193802, 11.9454606816, 12.0371589055, 12.1335834622, 12.2348065225,
    12.3409031815, 12.451951635, 12.5680333703, 12.6892333721, 12.8156403459, 12.9473469604,
    13.0844501106, 13.2270512038, 13.3752564721, 13.5291773131, 13.6889306622, 13.8546394014,
    14.0264328071, 14.2044470442, 14.3888257087, 14.5797204296, 14.7772915333, 14.9817087827,
    15.1931521989, 15.4118129785, 15.6378945193, 15.8716135725, 16.1132015385, 16.3629059311,
    16.6209920361, 16.8877447977, 17.1634709721, 17.4485015962, 17.7431948288, 18.0479392373,
    18.3631576158, 18.6893114469, 19.0269061415, 19.3764972321, 19.7386977384, 20.1141869897,
    20.5037212714, 20.908146778, 21.3284155152, 21.7656050115, 22.2209430181, 22.6958388268,
    23.1919235055, 23.7111023556, 24.2556244417, 24.8281764895, 25.4320124265, 26.0711365465,
    26.7505700282, 27.4767521009, 28.2581689204, 29.1063896342, 30.0378828994, 31.0774683887,
    32.2656247026, 33.6765518307, 35.4751047256, 38.2008348461,
];
