package com.bank;

public class InsufficientFundsException extends RuntimeException {
    private final long shortfall;

    public InsufficientFundsException(String owner, long shortfall) {
        super(owner + " is short by " + shortfall);
        this.shortfall = shortfall;
    }

    public long getShortfall() {
        return shortfall;
    }
}
