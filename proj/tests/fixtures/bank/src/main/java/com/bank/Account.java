package com.bank;

import com.bank.audit.AuditLog;

public class Account {
    private final String owner;
    private long balance;
    private final AuditLog log;

    public Account(String owner, long opening, AuditLog log) {
        this.owner = owner;
        this.balance = opening;
        this.log = log;
    }

    public String getOwner() {
        return owner;
    }

    public long getBalance() {
        return balance;
    }

    public void deposit(long amount) {
        if (amount <= 0) {
            throw new IllegalArgumentException("amount must be positive");
        }
        balance += amount;
        audit("deposit " + amount);
    }

    public void withdraw(long amount) {
        if (amount > balance) {
            throw new InsufficientFundsException(owner, amount - balance);
        }
        balance -= amount;
        audit("withdraw " + amount);
    }

    public boolean isEmpty() {
        return balance == 0;
    }

    private void audit(String entry) {
        log.record(owner + ": " + entry);
    }
}
